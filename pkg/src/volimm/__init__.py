"""Volume-preserving immersions: projections, Sobolev metrics and constrained geodesics."""
