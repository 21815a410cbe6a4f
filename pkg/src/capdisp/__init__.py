"""Spherical cap and lens dispersion of point sets on S^d."""
