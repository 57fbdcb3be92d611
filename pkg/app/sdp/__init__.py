# Semidefinite programs for decomposable and cb norms
