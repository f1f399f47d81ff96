"""Small value types shared by the continuous and discrete limitation modules."""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


class Klass(enum.Enum):
    """Multiplier class a limitation applies to."""

    NON_ODD = 'nonodd'
    ODD = 'odd'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, bool):
            return cls.ODD if value else cls.NON_ODD
        key = str(value).lower().replace('-', '').replace('_', '')
        for member in cls:
            if member.value == key:
                return member
        raise ValidationError(f"unknown multiplier class {value!r}")


class Sign(enum.IntEnum):
    POSITIVE = 1
    NEGATIVE = -1


@dataclass(frozen=True)
class PhaseLimit:
    """A phase limitation ``rho`` with the arguments that attain it.

    ``argmax`` holds times (continuous) or integers (discrete).
    """

    rho: float
    argmax: tuple
    klass: Klass = Klass.NON_ODD

    def __post_init__(self):
        object.__setattr__(self, 'argmax', tuple(self.argmax))

    @property
    def angle_deg(self):
        return float(np.degrees(np.arctan(self.rho)))

    def to_dict(self):
        return {'rho': float(self.rho), 'angle_deg': self.angle_deg,
                'argmax': [x.item() if hasattr(x, 'item') else x for x in self.argmax],
                'klass': self.klass.value}
