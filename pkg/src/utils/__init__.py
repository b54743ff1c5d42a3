"""File and document utilities for ttcalc."""
