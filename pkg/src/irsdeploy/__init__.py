"""Link-level simulation and deployment optimization for IRS-aided wireless links."""

__version__ = "0.1.0"
