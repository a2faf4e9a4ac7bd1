"""Organizational email network analysis.

Log ingestion and cleaning, org-chart resolution, unit/category graph
aggregation, betweenness and Girvan-Newman communities, deterministic
layouts, a hierarchical-broadcast model of out-degree distributions, and
per-minute traffic series.
"""

__version__ = "0.1.0"
