# FR-count based delta estimators
