# ghp-bounds: Bayes error rate bounds from a single global MST
