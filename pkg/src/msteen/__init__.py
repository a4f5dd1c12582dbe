"""Motivic mod-l Steenrod algebra over a field of characteristic zero."""
