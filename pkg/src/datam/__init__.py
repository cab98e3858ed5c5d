"""Dupled abstract tile assembly workbench."""
