"""
Settings package for geomodal.

``config.settings`` resolves to the development settings; tests select
``config.settings.test`` through pytest.ini.
"""

from .development import *
