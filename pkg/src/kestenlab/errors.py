"""Exception types shared across the package."""


class KestenLabError(Exception):
    """Base class for all package errors."""


class NotSquare(KestenLabError):
    pass


class ZeroRow(KestenLabError):
    pass


class NotMixing(KestenLabError):
    pass


class InadmissibleWord(KestenLabError):
    pass


class InadmissibleContext(KestenLabError):
    pass


class InvalidInvolution(KestenLabError):
    pass


class InvolutionMissing(KestenLabError):
    pass


class NoConvergence(KestenLabError):
    pass


class BackendMismatch(KestenLabError):
    pass


class BallTooLarge(KestenLabError):
    pass


class NotSymmetric(KestenLabError):
    pass


class EmptyWordSet(KestenLabError):
    pass


class NegativeInput(KestenLabError):
    pass


class TruncationDominates(KestenLabError):
    pass


class ConnectorNotFound(KestenLabError):
    """BFS budget exhausted before a trivial connector word was found."""

    def __init__(self, pair, max_len):
        self.pair = pair
        self.max_len = max_len
        super().__init__(f"no connector for {pair} within length {max_len}")


class FolnerStageFailed(KestenLabError):
    """A stage of a Folner sequence search exhausted its budget."""

    def __init__(self, stage, best_defect):
        self.stage = stage
        self.best_defect = best_defect
        super().__init__(f"stage {stage} failed, best defect {best_defect}")


class ConfigError(KestenLabError):
    """Invalid experiment configuration; carries the offending field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
