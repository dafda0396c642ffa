"""
Clinical types -- enumerations describing where a patient stayed and how their stay ended.
"""

from enum import Enum, IntEnum

from .errors import UnknownCareUnit, UnknownOutcome


class CareUnit(Enum):
    """ The seven care units a patient can be transferred through. """

    CCU   = "Coronary care unit"
    CSRU  = "Cardiac surgery recovery unit"
    MICU  = "Medical intensive care unit"
    NICU  = "Neonatal intensive care unit"
    NWARD = "Neonatal ward"
    SICU  = "Surgical intensive care unit"
    TSICU = "Trauma/surgical intensive care unit"

    @classmethod
    def parse(cls, value):
        """ Attempt to create a CareUnit from its code (e.g. "CCU") or an existing member. """

        if isinstance(value, cls):
            return value

        try:
            return cls[str(value).strip().upper()]
        except KeyError:
            raise UnknownCareUnit("unknown care unit {!r}".format(value)) from None


class Outcome(IntEnum):
    """ How a stay ended. The integer value is the classification label; PassedAway is the positive class. """

    SURVIVED    = 0
    PASSED_AWAY = 1

    @property
    def label(self):
        """ Returns the 0/1 classification label for this outcome. """
        return int(self)

    @property
    def token(self):
        """ Returns the canonical manifest spelling of this outcome. """
        return "died" if self is self.PASSED_AWAY else "survived"

    @classmethod
    def from_label(cls, label):
        return cls(int(label))

    @classmethod
    def parse(cls, value):
        """ Attempt to create an Outcome from a manifest string, a label, or an existing member. """

        if isinstance(value, cls):
            return value

        if isinstance(value, int):
            return cls.from_label(value)

        try:
            return _OUTCOME_SPELLINGS[str(value).strip().lower()]
        except KeyError:
            raise UnknownOutcome("unknown outcome {!r}".format(value)) from None


# Accepted manifest spellings; matched case-insensitively.
_OUTCOME_SPELLINGS = {
    'died':        Outcome.PASSED_AWAY,
    'passed_away': Outcome.PASSED_AWAY,
    'survived':    Outcome.SURVIVED,
    'alive':       Outcome.SURVIVED,
}
