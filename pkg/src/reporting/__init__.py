"""CSV and JSON artifact writers."""
