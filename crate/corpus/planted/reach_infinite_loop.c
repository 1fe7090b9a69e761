/* planted: the loop never terminates, so the return is dead */
int serve(void)
{
	for (;;) {
		handle(next_request());
	}
	return 0;
}
