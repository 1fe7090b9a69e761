int *p; int *q; int *r;
void f(void) { p = malloc(4); q = kmalloc(8); r = p; r = q; }
