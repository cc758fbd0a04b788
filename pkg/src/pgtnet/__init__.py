"""
pgtnet: event logs → prefix graphs → graph transformer remaining-time prediction
"""

__version__ = "0.3.0"
