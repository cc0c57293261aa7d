# oracle package: Monte Carlo ground truth for Gaussian mixtures
