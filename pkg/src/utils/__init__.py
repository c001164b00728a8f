"""Seeded random generators"""
