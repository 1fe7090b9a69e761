int **a; int **b; int *p; int *q; int x; int y; int *r;
void f(void) { a = &p; b = &q; p = &x; q = &y; *a = q; r = *b; }
