"""Readability and GDPR-coverage linting for privacy policies, plus a usable policy generator."""

__version__ = "0.1.0"
