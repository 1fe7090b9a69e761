int x; int y;
void f(int *in) { int *p = &x; int *q = p; int **pp = &q; *pp = in; in = &y; }
