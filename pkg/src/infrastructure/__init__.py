"""Command-line, configuration, logging, caching and file output."""
