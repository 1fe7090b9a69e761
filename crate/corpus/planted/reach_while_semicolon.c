/* planted: the semicolon after while makes the loop body empty */
void wait_ready(struct dev *d)
{
	while (!d->ready);
	{
		poll(d);
	}
}
