"""
URL configuration for geomodal.

The project is driven from the ``geomodal`` management command and
exposes no HTTP endpoints.
"""

urlpatterns = []
