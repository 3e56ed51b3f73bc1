"""BDD tests for the spinext command line."""
