class AlibiError(Exception):
    pass


class FastaParseError(AlibiError):

    def __init__(self, message: str, line_number: int) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ReservedByteError(AlibiError):

    def __init__(self, where: str, position: int | None = None) -> None:
        location = f" at position {position}" if position is not None else ""
        super().__init__(f"reserved separator byte '#' in {where}{location}")
        self.where = where
        self.position = position


class EmptyCollectionError(AlibiError):
    pass


class ProjectionError(AlibiError):
    pass


class ScriptError(AlibiError):
    pass


class StructuralError(AlibiError):
    pass


class ConstructionError(AlibiError):
    pass


class BoundsError(AlibiError, IndexError):
    pass


class ParameterError(AlibiError):
    pass


class FormatError(AlibiError):

    def __init__(self, message: str, section: str, expected: int | None = None, found: int | None = None) -> None:
        super().__init__(f"{section}: {message}")
        self.section = section
        self.expected = expected
        self.found = found


class ValidationError(AlibiError):

    def __init__(self, message: str, genome_id: str) -> None:
        super().__init__(f"genome {genome_id}: {message}")
        self.genome_id = genome_id
