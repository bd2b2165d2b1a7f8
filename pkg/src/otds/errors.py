"""Exception hierarchy shared across the package."""


class OTDSError(Exception):
    """Base class for all errors raised by this package."""


class DecodeError(OTDSError, ValueError):
    """Bytes do not encode a canonical value of the expected kind."""


class WitnessError(OTDSError, ValueError):
    """A prover was handed a witness that does not satisfy the statement."""


class ExtractionError(OTDSError):
    pass


class DeployError(OTDSError):
    pass


class UnknownContract(OTDSError, KeyError):
    pass


class ContractConsumed(OTDSError):
    """The contract has already accepted its permitted number of triggers."""


class InvalidProof(OTDSError):
    pass


class FlavorMismatch(OTDSError):
    """Trigger proof type does not match the contract variant."""


class UnsupportedVariant(OTDSError):
    pass


class KeyNotAuthorized(OTDSError):
    """Signer key is not among the contract's permitted keys."""
