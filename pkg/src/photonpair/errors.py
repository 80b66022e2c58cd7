"""Exception hierarchy shared by all photonpair modules."""


class PhotonPairError(Exception):
    """Base class for every error raised by this package."""


class DispersionRangeError(PhotonPairError, ValueError):
    """A wavelength falls outside the validity interval of a Sellmeier set."""

    def __init__(self, material, wavelength, valid_range):
        self.material = material
        self.wavelength = wavelength
        self.valid_range = valid_range
        lo, hi = valid_range
        super().__init__(
            f"wavelength {wavelength:.6g} nm is outside the {material} dispersion "
            f"range [{lo:g}, {hi:g}] nm"
        )


class PhasematchingError(PhotonPairError):
    """No cut angle phasematches the requested interaction."""


class SupportClippedError(PhotonPairError):
    """The frequency grid does not contain the support of the joint amplitude."""


class PhysicalityError(PhotonPairError, ValueError):
    """Gaussian-model moments violate T_ss^2 T_ii^2 > T_si^4."""


class EmptyHeraldingError(PhotonPairError):
    """The trigger filter has no overlap with the joint amplitude."""


class ClippedProfileError(PhotonPairError):
    """A profile maximum or e^-1 crossing touches the edge of its axis."""


class DegenerateProfileError(PhotonPairError):
    """A profile has no usable e^-1 crossing."""


class EmptyContourError(PhotonPairError):
    """A requested level set of a Wigner function is empty."""


class ContractError(PhotonPairError, ValueError):
    """An operation was called outside its stated preconditions."""


class DesignError(PhotonPairError):
    """A group-velocity-matching condition has no root in the search range."""


class ScenarioError(PhotonPairError, ValueError):
    """A scenario file could not be parsed."""

    def __init__(self, message, key=None):
        self.key = key
        super().__init__(message)
