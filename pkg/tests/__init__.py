"""Test suite for the tropical-adp package."""
