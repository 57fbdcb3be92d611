# Dense linear algebra kernels
