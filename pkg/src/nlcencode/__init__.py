"""Sparse encodings of graphs given by k-NLC-trees."""
