"""Exception types raised across the package."""


class BwtLcpError(Exception):
    """Base class for every error raised by bwtlcp."""


class CollectionError(BwtLcpError, ValueError):
    pass


class EmptyCollection(CollectionError):
    def __init__(self):
        super().__init__("collection contains no strings")


class EmptyString(CollectionError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"string {index} is empty")


class ForeignSymbol(CollectionError):
    def __init__(self, index, offset, char):
        self.index = index
        self.offset = offset
        self.char = char
        super().__init__(
            f"string {index} offset {offset}: symbol {char!r} is not in the alphabet"
        )


class PositionOutOfRange(BwtLcpError, IndexError):
    pass


class IoFailure(BwtLcpError, OSError):
    pass


class WidthTooSmall(BwtLcpError, ValueError):
    def __init__(self, width, max_value):
        self.width = width
        self.max_value = max_value
        super().__init__(
            f"lcp width of {width} byte(s) cannot represent values up to {max_value}"
        )


class MissingGeneration(BwtLcpError, FileNotFoundError):
    pass


class InconsistentState(BwtLcpError, RuntimeError):
    pass


class ParseError(BwtLcpError, ValueError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class CapExceeded(BwtLcpError, ValueError):
    def __init__(self, total, cap):
        self.total = total
        self.cap = cap
        super().__init__(f"verify mode refuses N={total} (cap is {cap})")
