#!/usr/bin/env python3
"""Entry point for the definite-sums command."""
from .interfaces.cli import cli

def main():
    cli(prog_name="definite-sums")

if __name__ == "__main__":
    main()
