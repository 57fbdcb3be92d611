# Decomposable-norm laboratory
