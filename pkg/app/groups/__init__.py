# Finite groups, cocycles and twisted group algebras
