"""Monic polynomials whose unit lemniscates have many large components.

Pipeline: an ellipse of logarithmic capacity one (the image of a circle under
a shifted Joukowski map), a family of disjoint strips inside it, Leja roots on
the strip outlines, sup-norm normalization, and a positive rescaling that makes
the polynomial monic. A raster verifier labels the components of the final
sublevel set and measures their diameters.
"""

__version__ = "0.1.0"
