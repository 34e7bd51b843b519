from enum import Enum, auto


class ModeKind(Enum):
    Qubit = "qubit"
    Coupler = "coupler"

    def min_local_dim(self):
        if self is ModeKind.Qubit:
            return 2
        return 1


class TargetName(Enum):
    GHZ = "GHZ"
    iToffoli = "iToffoli"
    CCNOT = "CCNOT"
    CZZ = "CZZ"

    def is_state_preparation(self):
        return self is TargetName.GHZ

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        from .exceptions import ConfigurationError

        raise ConfigurationError(
            f"Unknown target {value!r}, expected one of {[x.value for x in cls]}"
        )


class SegmentKind(Enum):
    SingleQubitGate = auto()
    PCRPulse = auto()
    Idle = auto()


class EdgeShape(Enum):
    Cosine = "cosine"
    Gaussian = "gaussian"


class RowStatus(Enum):
    Success = "success"
    NotConverged = "not_converged"
    Failed = "failed"

    def exit_code(self):
        if self is RowStatus.Success:
            return 0
        elif self is RowStatus.NotConverged:
            return 4
        else:
            return 3
