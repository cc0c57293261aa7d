# synth package: circle-of-Gaussians generators
