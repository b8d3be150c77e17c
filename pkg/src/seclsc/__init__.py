"""Secure distributed linearly separable computation: build, verify, bound."""
