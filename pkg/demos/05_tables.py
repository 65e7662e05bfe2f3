"""Recompute the multi-trapdoor tables and show where they agree."""
from collections import Counter

from covertlab.tables import reproduce_tables

report = reproduce_tables()
print(report.render())
print(Counter(c.tag.value for c in report.cells))
