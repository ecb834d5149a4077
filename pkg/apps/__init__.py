"""Django apps of the geomodal project."""
