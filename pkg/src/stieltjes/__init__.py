"""Determinacy of Stieltjes moment problems from asymptotic information.

Modules: ``exprdsl`` (exp-log expressions), ``convex`` (convex profiles and
Legendre transforms), ``criteria`` (classical and asymptotic criteria),
``levy`` (log-Levy laws), ``oracle`` (numerical ground truth), ``catalog``
(fixtures) and ``cli``.
"""
__version__ = "0.1.0"
