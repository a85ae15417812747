"""
Initialization file for cli package.

Each module registers one subcommand through `register(subparsers, parent)`.
"""
