# geometry package: Euclidean MSTs and dichotomous-edge counts
