"""
Spectrum Sensing Benchmark

Een bibliotheek en CLI voor spectrum sensing van lineair gemoduleerde
signalen: cyclostationaire detectie, energiedetectie en eigenwaarde
detectoren (MME/EME), vergeleken onder onzekerheid in het ruisvermogen.
"""

__version__ = "1.0.0"
__author__ = "Sensing Benchmark Team"
