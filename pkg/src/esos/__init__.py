"""Spider embedding in dense graphs: graph core, path surgery, case
analyzers with machine-checkable witnesses, embed-or-certify, and a
desk-scale exhaustive verification harness."""

from .errors import CapabilityError, EsosError, InputError, SoundnessError
from .graphs import Graph, HCertificate
from .spiders import Spider
from .paths import UPath

__all__ = [
    "CapabilityError",
    "EsosError",
    "Graph",
    "HCertificate",
    "InputError",
    "SoundnessError",
    "Spider",
    "UPath",
]
