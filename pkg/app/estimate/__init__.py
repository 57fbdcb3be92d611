# Lower bounds for Schatten p->p norms
