"""
Exception hierarchy for vitalsign -- every failure a pipeline stage can report.

Each concrete error carries an EXIT_STATUS, which the command runner uses as the process
exit code; data-validation problems derive from ValueError and numeric failures from
ArithmeticError, so callers that don't care about our hierarchy can still catch them.
"""


class VitalSignError(Exception):
    """ Base class for all errors raised by vitalsign. """

    # Exit status used by the command runner when this error escapes a stage.
    EXIT_STATUS = 3


class DataValidationError(VitalSignError, ValueError):
    """ Input data doesn't satisfy the invariants of the type being built from it. """
    EXIT_STATUS = 3


class NumericFailure(VitalSignError, ArithmeticError):
    """ A numerical procedure couldn't produce a usable result. """
    EXIT_STATUS = 4


#
# Record and manifest ingestion.
#

class MalformedHeader(DataValidationError):
    pass

class NonPositiveRate(DataValidationError):
    pass

class EmptyRecord(DataValidationError):
    pass

class NonNumericSample(DataValidationError):
    pass

class DuplicatePatient(DataValidationError):
    pass

class UnknownCareUnit(DataValidationError):
    pass

class UnknownOutcome(DataValidationError):
    pass


#
# Preprocessing and features.
#

class AllInvalid(DataValidationError):
    """ Nothing but zeros and missing samples remain after tail truncation. """

class LeadingMissing(DataValidationError):
    """ Forward fill has no previous value for the first sample. """

class IrrationalRatio(NumericFailure):
    """ The resampling ratio has no small rational approximation. """

class TooShort(DataValidationError):
    pass

class TooFewRows(DataValidationError):
    pass


#
# Rebalancing.
#

class DegenerateMinority(DataValidationError):
    pass

class SingleClass(DataValidationError):
    pass


#
# Classifiers and evaluation.
#

class InvalidDistribution(DataValidationError):
    pass

class EmptyData(DataValidationError):
    pass

class NoBranches(DataValidationError):
    """ Predictor importance was requested for a tree that never split. """

class SingularCovariance(NumericFailure):
    pass

class KTooLarge(DataValidationError):
    pass

class DimensionMismatch(DataValidationError):
    pass

class TooFewSamples(DataValidationError):
    pass

class UnknownVariant(DataValidationError):
    """ A model document or command named a classifier we don't have. """

class InvalidLabels(DataValidationError):
    """ Training labels aren't a 0/1 vector matching the feature rows. """

class UnknownParameter(DataValidationError):
    """ A classifier was given a hyperparameter it doesn't take. """


#
# Command line.
#

class UsageError(VitalSignError):
    """ The command line or configuration file asked for something we can't do. """
    EXIT_STATUS = 1
