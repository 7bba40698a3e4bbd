"""Exception types raised across the package."""


class ImageTooSmall(ValueError):
    """Raised when an image is smaller than an operation's neighborhood."""


class DimensionMismatch(ValueError):
    """Raised when two rasters that must align have different shapes."""


class ValueOverflow(ValueError):
    """Raised when pixel values fall outside [0, 1]."""


class RegionOutOfBounds(ValueError):
    """Raised when a rectangle does not lie within the image."""


class EmptyMap(ValueError):
    pass


class EmptyImage(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class DecodeError(OSError):
    """Raised when an image file cannot be decoded."""


class DirectoryUnreadable(OSError):
    pass


class UnmatchedFiles(Exception):
    """Raised when files in one directory have no counterpart in the other.

    The ``orphans`` attribute lists the offending paths.
    """

    def __init__(self, orphans):
        self.orphans = list(orphans)
        super().__init__(
            f"{len(self.orphans)} file(s) without a counterpart: "
            + ", ".join(str(o) for o in self.orphans)
        )
