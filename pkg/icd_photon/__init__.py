"""icd-photon: two- and three-body interatomic Coulombic decay rates in the virtual photon picture."""

__version__ = "0.1.0"
