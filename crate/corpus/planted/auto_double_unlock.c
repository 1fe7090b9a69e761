/* planted: the error branch unlocks, then falls through to a second unlock */
void queue_flush(struct queue *q)
{
	mutex_lock(&q->lock);
	if (q->broken) {
		mutex_unlock(&q->lock);
	}
	drain(q);
	mutex_unlock(&q->lock);
}
