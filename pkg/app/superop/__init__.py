# Linear maps between matrix algebras
