"""Measure algebras, step functions and L_log functions"""
