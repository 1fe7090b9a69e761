int *a; int *b; int *t; int x; int y;
void swap(void) { a = &x; b = &y; t = a; a = b; b = t; }
