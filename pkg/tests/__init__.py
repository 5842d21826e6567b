"""Tests for selmer_expansions package."""
