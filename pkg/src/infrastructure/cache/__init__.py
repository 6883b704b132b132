"""Reference solution cache."""
