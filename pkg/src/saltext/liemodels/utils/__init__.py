"""
Engine for free bigraded Lie models over the rationals.

The execution module and the console script are thin front ends over the
modules in this package.
"""
