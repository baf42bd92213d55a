"""
Command-line front door: gen, train, predict, compare and verify.
"""
